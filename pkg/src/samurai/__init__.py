"""Shape-aware multimodal retrieval engine.

Pipeline: masked-region preprocessing, dual text/shape embedding ranking,
hybrid re-ranking, weighted vote fusion, and Recall@k / MRR evaluation.
"""

__version__ = "0.1.0"
