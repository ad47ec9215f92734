from slce.cli import entry

entry()
