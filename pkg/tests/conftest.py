import pytest

from montage_dialog.memory_graph import GenConfig, generate_collection
from montage_dialog.simulator import SimConfig, generate_dialogs

FIXTURE_SEED = 42


@pytest.fixture(scope="session")
def graph():
    return generate_collection(GenConfig(seed=1))


@pytest.fixture(scope="session")
def small_corpus():
    """60 default-config dialogs plus their per-dialog graphs."""
    dialogs, graphs = [], {}
    for dialog, g in generate_dialogs(60, GenConfig(seed=0), SimConfig(),
                                      seed=FIXTURE_SEED):
        dialogs.append(dialog)
        graphs[g.graph_id] = g
    return dialogs, graphs
