from typing import Dict, List, Literal, Optional
from pydantic import BaseModel, Field

FlowMethod = Literal["greedy", "maxflow-expanded", "maxflow-lp"]


class TraceRow(BaseModel):
    """One processed interaction and the buffers right after it."""
    step: int = Field(..., description="1-based position in the processing order.")
    src: str = Field(..., description="Sending vertex.")
    dst: str = Field(..., description="Receiving vertex.")
    t: int = Field(..., description="Timestamp of the interaction.")
    q: int = Field(..., description="Quantity offered by the interaction.")
    moved: int = Field(..., description="Quantity actually transferred.")
    buffers: Dict[str, int] = Field(..., description="Buffer of every non-source vertex after the step.")


class FlowResult(BaseModel):
    """
    **Flow Computation Result**

    Value of a flow plus the realized transfer of every interaction, so the
    result doubles as a feasibility witness.

    Attributes:
    - **value** (`int`): Total quantity delivered to the sink.
    - **transfers** (`Dict[int, int]`): Interaction id (input sequence number) to transferred quantity.
    - **method** (`str`): `greedy`, `maxflow-expanded` or `maxflow-lp`.
    - **trace** (`List[TraceRow]`, optional): Buffer table, only when requested for greedy.
    - **runtime_us** (`int`, optional): Wall-clock time of the computation in microseconds.
    """
    value: int = Field(..., description="Flow delivered to the sink.")
    transfers: Dict[int, int] = Field(default_factory=dict, description="Transferred quantity per interaction id.")
    method: FlowMethod = Field(..., description="Algorithm that produced the result.")
    trace: Optional[List[TraceRow]] = Field(None, description="Greedy buffer trace.")
    runtime_us: Optional[int] = Field(None, description="Runtime in microseconds.")
