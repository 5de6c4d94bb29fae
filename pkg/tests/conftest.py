import numpy as np
import pytest

from ecoform.energy import Coalition
from ecoform.isg import IsgInstance, IsgMeta


@pytest.fixture
def three_node_instance() -> IsgInstance:
    """The worked 3-node game: one good pair (0,1) and a node 2 that drags both."""
    w = np.zeros((3, 3))
    w[0, 1] = w[1, 0] = 1.0
    w[0, 2] = w[2, 0] = -0.5
    w[1, 2] = w[2, 1] = -0.5
    return IsgInstance(n=3, weights=w, meta=IsgMeta(source="random"))


@pytest.fixture
def grand3() -> Coalition:
    return Coalition(frozenset({0, 1, 2}))
