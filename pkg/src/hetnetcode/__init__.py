"""Random linear network coding over parallel cellular and WiFi paths."""

from . import gf256, rlnc, routing, simengine, topology
from .errors import ConfigError, NoPathError
from .rlnc import CodedPacket, DecoderState, RecodeBuffer, SourceBlock
from .routing import ForwardPolicy, RouteTable, build_routes
from .simengine import (
    EventTrace,
    ScenarioConfig,
    SessionStats,
    compare_modes,
    loaded_cellular_rate,
    run_session,
    schedule_wifi_slot,
)
from .topology import HetNetTopology, Node, TopologyParams, generate

__version__ = "0.1.0"
