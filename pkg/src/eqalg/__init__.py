"""Rational equivariant algebra for finite groups: Burnside rings, Mackey
functors, representation rings, K-theory Mackey functors, free CDGA models
and formality certificates."""

__version__ = "0.1.0"

SCHEMA_VERSION = "1.0"
