"""Exception taxonomy.

Every error carries an ``exit_code`` used by the CLI: 2 for configuration
errors, 3 for data errors, 4 for internal invariant violations.
"""


class SamuraiError(Exception):
    exit_code = 3


class ConfigError(SamuraiError):
    """Invalid parameters or parameter combinations."""

    exit_code = 2


class DataError(SamuraiError):
    """Malformed or missing input data."""

    exit_code = 3


class InternalError(SamuraiError):
    """A pipeline invariant was violated; indicates a bug upstream."""

    exit_code = 4


# -- dataset ---------------------------------------------------------------

class MissingRoot(DataError):
    pass


class EmptyDataset(DataError):
    pass


class MalformedDataset(DataError):
    """One or more dataset entries are missing required files.

    ``entries`` is a list of ``(entry_id, reason)`` pairs.
    """

    def __init__(self, entries):
        self.entries = list(entries)
        lines = ", ".join(f"{eid}: {reason}" for eid, reason in self.entries)
        super().__init__(f"{len(self.entries)} malformed entries ({lines})")


class DecodeError(DataError):
    pass


class Utf8Error(DataError):
    pass


# -- mask pipeline ----------------------------------------------------------

class EmptyMask(DataError):
    pass


class EmptyRefinedMask(InternalError):
    pass


# -- embedding store --------------------------------------------------------

class ParseError(DataError):
    def __init__(self, line_no, reason):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {reason}")


class DimensionMismatch(DataError):
    pass


class DuplicateRecord(DataError):
    pass


class ZeroVector(DataError):
    pass


class PolarityMismatch(DataError):
    pass


class MissingEmbedding(DataError):
    """One or more (modality, id) pairs absent from the store."""

    def __init__(self, pairs):
        self.pairs = sorted(pairs)
        listed = ", ".join(f"{m}/{i}" for m, i in self.pairs)
        super().__init__(f"missing embeddings: {listed}")


# -- retrieval --------------------------------------------------------------

class SceneMismatch(InternalError):
    pass


class CatalogMismatch(InternalError):
    pass


# -- evaluation -------------------------------------------------------------

class MissingTruth(DataError):
    pass


class UnknownScene(DataError):
    pass


class EmptyResults(DataError):
    pass


# -- synthesis --------------------------------------------------------------

class InfeasibleMargin(ConfigError):
    pass
