from .configmanager import ConfigManager
from .instance import Instance, InstanceSpec, InstanceSpecBuilder, gen_instance, save_instance, load_instance
from .result_store import ResultStore

__all__ = [
    "ConfigManager",
    "Instance",
    "InstanceSpec",
    "InstanceSpecBuilder",
    "gen_instance",
    "save_instance",
    "load_instance",
    "ResultStore",
]
