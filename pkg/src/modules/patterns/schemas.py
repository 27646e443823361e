from typing import Dict, Literal, Optional
from pydantic import BaseModel, Field, model_validator


class RelaxedPattern(BaseModel):
    """
    **Non-rigid Pattern**

    An anchor linked to itself (or to a second anchor) by any number of parallel
    ``hops``-long paths whose interior vertices are pairwise distinct.

    Attributes:
    - **anchor** (`str`): Label of the anchor the paths start from.
    - **sink** (`str`): Label the paths end at; equal to `anchor` for cycles.
    - **hops** (`int`): Length of every parallel path.
    - **min_paths** (`int`): Report only anchors with at least this many paths.
    """
    anchor: str = Field("a", description="Start label of the parallel paths.")
    sink: str = Field("a", description="End label; equal to anchor for cycles.")
    hops: int = Field(2, ge=1, description="Hop length of each path.")
    min_paths: int = Field(1, ge=1, description="Minimum number of parallel paths.")

    @property
    def cyclic(self) -> bool:
        return self.anchor == self.sink

    @model_validator(mode="after")
    def check_shape(self) -> "RelaxedPattern":
        if self.cyclic and self.hops < 2:
            raise ValueError("cyclic relaxed patterns need hops >= 2")
        return self


class NonrigidMatch(BaseModel):
    """Aggregated parallel paths found at one anchor."""
    anchor: str = Field(..., description="Anchor vertex.")
    sink: Optional[str] = Field(None, description="End vertex for non-cyclic patterns.")
    path_count: int = Field(..., description="Number of interior-disjoint parallel paths.")
    total_flow: int = Field(..., description="Sum of the paths' flows.")


class PatternMatch(BaseModel):
    """One pattern instance and its flow."""
    bindings: Dict[str, str] = Field(..., description="Pattern label to graph vertex.")
    value: int = Field(..., description="Flow through the instance.")
    coverage: Optional[Literal["full", "partial"]] = Field(None, description="How path tables covered the instance.")


class PatternSummary(BaseModel):
    """Totals printed after an enumeration."""
    method: Literal["gb", "pb", "nonrigid"] = Field(..., description="Enumeration method.")
    instances: int = Field(..., description="Instances found.")
    avg_flow: float = Field(..., description="Average flow per instance.")
