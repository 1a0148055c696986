"""Domain types: grids, data matrices, codecs and evaluation results."""
