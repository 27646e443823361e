import pytest

from src.modules.graph.models import FlowInstance, TemporalGraph
from src.modules.graph.services import normalize_by_name
from tests.factories import graph_from_text

# y forwards everything to z at t=3 and has nothing left for (y,t) at t=4
RESERVATION = """\
s y 1 5
s z 2 3
y z 3 5
y t 4 4
z t 5 1
"""

CHAIN = """\
s y 1 3
s y 5 4
y z 2 2
y z 4 5
y z 7 6
z t 6 5
z t 8 4
"""

# every vertex but s and t has one outgoing edge
SINGLE_OUT = """\
s a 1 6
s b 2 8
a c 3 5
a c 6 4
b c 4 9
c t 5 7
c t 8 10
"""

EARLY_DEPARTURES = """\
s x 5 4
s x 7 3
x y 2 7
x y 9 6
x z 1 2
x z 10 5
y t 3 3
y t 12 4
z t 4 2
z t 13 3
"""

CASCADE = """\
s x 5 2
s x 8 3
x y 3 4
y z 6 1
s z 6 5
z t 4 2
z t 9 4
y t 7 2
"""

# two source chains: s-y-x-z merges into (s,z), then s-z-w becomes (s,w)
SIMPLIFIABLE = """\
s y 1 4
y x 2 3
y x 6 5
x z 3 2
x z 7 1
s z 2 5
s z 11 2
z w 4 6
z w 12 3
w t 13 5
w u 5 6
u t 14 2
"""

TOY = """\
u1 u2 1 5
u1 u2 4 1
u2 u3 3 4
u2 u3 5 6
u3 u1 1 2
u3 u1 6 5
u3 u4 7 3
"""

SAME_TIMESTAMP = """\
s a 4 9
a t 4 9
"""

CYCLE_PATTERN = """\
a -> b
b -> c
c -> a2:a
"""


def _instance(text: str) -> FlowInstance:
    return normalize_by_name(graph_from_text(text), ["s"], ["t"])


@pytest.fixture
def reservation_instance() -> FlowInstance:
    return _instance(RESERVATION)


@pytest.fixture
def chain_instance() -> FlowInstance:
    return _instance(CHAIN)


@pytest.fixture
def single_out_instance() -> FlowInstance:
    return _instance(SINGLE_OUT)


@pytest.fixture
def early_departures_instance() -> FlowInstance:
    return _instance(EARLY_DEPARTURES)


@pytest.fixture
def cascade_instance() -> FlowInstance:
    return _instance(CASCADE)


@pytest.fixture
def simplifiable_instance() -> FlowInstance:
    return _instance(SIMPLIFIABLE)


@pytest.fixture
def same_timestamp_instance() -> FlowInstance:
    return _instance(SAME_TIMESTAMP)


@pytest.fixture
def toy_graph() -> TemporalGraph:
    return graph_from_text(TOY)


@pytest.fixture
def write_records(tmp_path):
    """Writes record text to a file and returns its path."""
    def write(text: str, name: str = "graph.tsv"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path
    return write
