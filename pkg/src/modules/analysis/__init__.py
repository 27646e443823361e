from .services import chain_reduce, greedy_soluble, preprocess, simplify

__all__ = ['greedy_soluble', 'preprocess', 'chain_reduce', 'simplify']
