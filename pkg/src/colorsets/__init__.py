"""Maximal rectangles and squares of a color matrix, indexed by color set."""
