from typing import Literal, Optional
from pydantic import BaseModel, Field

ResolvedBy = Literal["greedy", "greedy-after-preprocess", "greedy-after-simplify", "exact", "trivial"]


class ReductionReport(BaseModel):
    """
    **Reduction Report**

    What preprocessing and simplification removed from an instance, and which
    step finally produced the flow value.

    Attributes:
    - **interactions_removed** / **edges_removed** / **vertices_removed** (`int`): Size differences before and after.
    - **chains_reduced** (`int`): Source-anchored chains replaced by a single edge.
    - **edges_merged** (`int`): Chain replacements that landed on an existing source edge.
    - **became_trivial** (`bool`): Source or sink was deleted, or the sink lost all incoming edges; flow is 0.
    - **resolved_by** (`str`, optional): Set by the max-flow orchestrator.
    """
    interactions_removed: int = Field(0, ge=0, description="Interactions deleted.")
    edges_removed: int = Field(0, ge=0, description="Edges deleted.")
    vertices_removed: int = Field(0, ge=0, description="Vertices deleted.")
    chains_reduced: int = Field(0, ge=0, description="Source chains reduced to one edge.")
    edges_merged: int = Field(0, ge=0, description="Reduced chains merged into an existing edge.")
    became_trivial: bool = Field(False, description="Flow is known to be 0.")
    resolved_by: Optional[ResolvedBy] = Field(None, description="Step that produced the flow value.")

    def combine(self, other: "ReductionReport") -> "ReductionReport":
        return ReductionReport(
            interactions_removed=self.interactions_removed + other.interactions_removed,
            edges_removed=self.edges_removed + other.edges_removed,
            vertices_removed=self.vertices_removed + other.vertices_removed,
            chains_reduced=self.chains_reduced + other.chains_reduced,
            edges_merged=self.edges_merged + other.edges_merged,
            became_trivial=self.became_trivial or other.became_trivial,
            resolved_by=other.resolved_by or self.resolved_by,
        )

    def is_empty(self) -> bool:
        return not (
            self.interactions_removed or self.edges_removed or self.vertices_removed
            or self.chains_reduced or self.edges_merged or self.became_trivial
        )
