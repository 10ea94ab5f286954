from samurai.cli import main

main()
