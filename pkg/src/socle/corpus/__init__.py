"""Bundled example scripts exercised by the command line and the test suite."""
