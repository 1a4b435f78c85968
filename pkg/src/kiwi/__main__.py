from kiwi.cli.main import entry

entry()
