from typing import List, Optional
from pydantic import BaseModel, Field


## Response Schemas ##

class GraphSummary(BaseModel):
    """
    **Ingestion Summary**

    Size and time span of a parsed interaction file, printed by `ingest`.

    Attributes:
    - **vertices** (`int`): Number of distinct vertices after interning.
    - **edges** (`int`): Number of ordered vertex pairs carrying at least one interaction.
    - **interactions** (`int`): Total interaction count across all edge series.
    - **t_min** / **t_max** (`int`, optional): Earliest and latest timestamps; absent for an empty graph.
    - **same_timestamp_relays** (`int`): Vertices that receive and send at the same timestamp.
    """
    vertices: int = Field(..., description="Number of vertices.")
    edges: int = Field(..., description="Number of edges (merged ordered pairs).")
    interactions: int = Field(..., description="Number of interactions.")
    t_min: Optional[int] = Field(None, description="Earliest timestamp.")
    t_max: Optional[int] = Field(None, description="Latest timestamp.")
    same_timestamp_relays: int = Field(0, description="Vertices receiving and sending at one timestamp.")


class InstanceSummary(BaseModel):
    """Shape of a normalized flow instance."""
    source: str = Field(..., description="Name of the source vertex.")
    sink: str = Field(..., description="Name of the sink vertex.")
    vertices: int = Field(..., description="Number of vertices.")
    edges: int = Field(..., description="Number of edges.")
    interactions: int = Field(..., description="Number of interactions.")
    zero_flow: bool = Field(False, description="True when no flow can reach the sink.")
    synthetic: List[str] = Field(default_factory=list, description="Synthetic or split vertices added by normalization.")
