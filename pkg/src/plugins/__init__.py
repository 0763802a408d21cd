from src.plugins.base import (
    PLUGIN_FACTORIES, PLUGIN_ORDER, Plugin, PluginChain, build_plugin, compose_plugins,
)
from src.plugins.breakdowns import breakdown_plugin
from src.plugins.consumption import consumption_plugin
from src.plugins.setup_times import setup_time_plugin
from src.plugins.stochastic import stochasticity_plugin
