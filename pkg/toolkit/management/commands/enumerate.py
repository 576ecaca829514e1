from fieldcore.cyclotomic import make_field
from heights.enumeration import enumerate_bounded_height, enumeration_to_json
from toolkit.runner import ToolkitCommand
from toolkit.serializers import EnumerateConfigSerializer


class Command(ToolkitCommand):
    help = "Orbit representatives of elements of Weil height at most X"
    command_name = "enumerate"
    serializer_class = EnumerateConfigSerializer
    config_options = ("m", "X")

    def add_config_arguments(self, parser):
        parser.add_argument("--m", type=int)
        parser.add_argument("--X", dest="X", help="height bound")

    def compute(self, config, threads):
        records = enumerate_bounded_height(make_field(config["m"]), config["X"])
        return {"orbit_count": len(records), "orbits": enumeration_to_json(records)}
