from .base import AnalyticOperator, ResolventNorm

__all__ = ["AnalyticOperator", "ResolventNorm"]
