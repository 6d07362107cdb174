"""Scenario files shipped with the package, loadable as ``standard:<name>``."""
