from .routing import router

__all__ = ['router']
