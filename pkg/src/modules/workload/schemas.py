from typing import Literal, Optional
from pydantic import BaseModel, Field

from src.modules.maxflow.schemas import InstanceClass

SizeBucket = Literal["<100", "100-1000", ">1000"]


class SyntheticSpec(BaseModel):
    """
    **Synthetic Instance Specification**

    Shape of a generated flow instance. Generation is deterministic for a given
    `rng_seed`.

    Attributes:
    - **vertices** (`int`): Vertex count including source and sink.
    - **edges** (`int`): Edge count.
    - **interactions** (`int`): Interaction count; every edge carries at least one.
    - **class_bias** (`str`): `A` (greedy-soluble as is), `B` (soluble after preprocessing) or `C` (general).
    - **rng_seed** (`int`): Seed of the generator.
    - **count** (`int`): Number of instances, seeded `rng_seed`, `rng_seed + 1`, ...
    """
    vertices: int = Field(..., ge=2, description="Vertex count including source and sink.")
    edges: int = Field(..., ge=1, description="Edge count.")
    interactions: int = Field(..., ge=1, description="Interaction count.")
    class_bias: InstanceClass = Field("C", description="Topology family to generate.")
    rng_seed: int = Field(42, description="Generator seed.")
    count: int = Field(1, ge=1, description="Instances generated from consecutive seeds.")
    max_timestamp: int = Field(1000, ge=8, description="Timestamps are drawn from [1, max_timestamp].")
    max_quantity: int = Field(100, ge=4, description="Quantities are drawn from [1, max_quantity].")


class BenchRecord(BaseModel):
    """One benchmarked instance: runtimes of every method and the agreed flow value."""
    instance_id: str = Field(..., description="Seed vertex or synthetic spec the instance came from.")
    instance_class: InstanceClass = Field(..., description="A/B/C triage.")
    interactions: int = Field(..., description="Interaction count of the instance.")
    value: int = Field(..., description="Maximum flow, agreed by lp, pre and presim.")
    greedy_value: int = Field(..., description="Greedy flow.")
    greedy_us: int = Field(..., description="Greedy runtime in microseconds.")
    lp_us: int = Field(..., description="lp runtime in microseconds.")
    pre_us: int = Field(..., description="pre runtime in microseconds.")
    presim_us: int = Field(..., description="presim runtime in microseconds.")


class BenchSummaryRow(BaseModel):
    """
    **Benchmark Summary Row**

    Averages over a group of records, either one instance class or one size
    bucket. Runtimes are in milliseconds.
    """
    group: str = Field(..., description="Class (A, B, C) or size bucket.")
    instances: int = Field(..., description="Records in the group.")
    avg_interactions: float = Field(..., description="Average interaction count.")
    greedy_ms: float = Field(..., description="Average greedy runtime.")
    lp_ms: float = Field(..., description="Average lp runtime.")
    pre_ms: float = Field(..., description="Average pre runtime.")
    presim_ms: float = Field(..., description="Average presim runtime.")
    greedy_exact: int = Field(..., description="Instances where greedy reached the maximum flow.")


class ExtractedSummary(BaseModel):
    """One extracted subgraph."""
    seed: str = Field(..., description="Seed vertex the subgraph was grown from.")
    sink: Optional[str] = Field(None, description="Second seed for non-cyclic extraction.")
    vertices: int = Field(..., description="Vertex count after normalization.")
    edges: int = Field(..., description="Edge count.")
    interactions: int = Field(..., description="Interaction count.")
