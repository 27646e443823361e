from .services import greedy_chain_boundary, greedy_flow

__all__ = ['greedy_flow', 'greedy_chain_boundary']
