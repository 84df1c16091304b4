"""Pattern occurrence in finite regular and context-free languages."""

from .errors import DomainError, ParseError, ResourceError

__all__ = ["DomainError", "ParseError", "ResourceError"]
__version__ = "0.1.0"
