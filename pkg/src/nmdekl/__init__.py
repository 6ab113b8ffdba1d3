"""Three-layer dependent type checker with trace-indexed knowledge fibres,
a finite Set-presheaf semantics and a mu-calculus model-checking bridge."""

__version__ = "0.1.0"
