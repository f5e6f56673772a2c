"""moebius: a reference implementation of a multi-level contextual modal
lambda-calculus with pattern matching on open code.

The package parses, kind/type-checks and evaluates polymorphic programs
that build and inspect code templates.  See README.md for the tour.
"""

__version__ = "0.1.0"
