from typing import List, Literal, Optional
from pydantic import BaseModel, Field

from src.modules.analysis.schemas import ReductionReport
from src.modules.greedy.schemas import FlowMethod, TraceRow

Strategy = Literal["lp", "pre", "presim"]
InstanceClass = Literal["A", "B", "C"]


class FlowReport(BaseModel):
    """
    **Flow Command Output**

    One record per `flow` invocation.

    Attributes:
    - **value** (`int`): Flow delivered to the sink.
    - **method** (`str`): Requested method: `greedy`, `lp`, `pre` or `presim`.
    - **solver** (`str`): Algorithm that produced the value (`greedy`, `maxflow-expanded`, `maxflow-lp`).
    - **reduction** (`ReductionReport`, optional): What preprocessing and simplification removed.
    - **runtime_us** (`int`): Wall-clock time of the computation.
    - **lp_variables** (`int`, optional): LP variable count of the normalized input instance.
    - **instance_class** (`str`, optional): A, B or C triage of the input instance.
    """
    source: str = Field(..., description="Source vertex.")
    sink: str = Field(..., description="Sink vertex.")
    value: int = Field(..., description="Flow value.")
    method: str = Field(..., description="Requested method.")
    solver: FlowMethod = Field(..., description="Algorithm that produced the value.")
    reduction: Optional[ReductionReport] = Field(None, description="Reduction summary.")
    runtime_us: int = Field(0, description="Runtime in microseconds.")
    lp_variables: Optional[int] = Field(None, description="LP variables of the normalized input instance.")
    instance_class: Optional[InstanceClass] = Field(None, description="A/B/C triage.")
    trace: Optional[List[TraceRow]] = Field(None, description="Greedy buffer trace.")
