from .graph import verifier_graph

__all__ = ["verifier_graph"]
