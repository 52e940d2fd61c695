"""mathdoc: typed knowledge graphs for mathematical workflows plus
boolean-ring rule mining from binary object data."""

__version__ = "0.1.0"
