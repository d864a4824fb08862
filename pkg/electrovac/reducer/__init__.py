from .graph import reducer_graph

__all__ = ["reducer_graph"]
