from mpmath import mp

from fieldcore.cyclotomic import make_field
from toolkit.runner import ToolkitCommand
from toolkit.serializers import ZetaConfigSerializer
from utils.rendering import decimal_string
from zeta.dedekind import dedekind_zeta


class Command(ToolkitCommand):
    help = "Certified enclosure of the Dedekind zeta function of Q(zeta_m)"
    command_name = "zeta"
    serializer_class = ZetaConfigSerializer
    config_options = ("m", "s", "tol")

    def add_config_arguments(self, parser):
        parser.add_argument("--m", type=int)
        parser.add_argument("--s")
        parser.add_argument("--tol")

    def compute(self, config, threads):
        field = make_field(config["m"])
        value = dedekind_zeta(field, config["s"], config["tol"])
        return {
            "degree": field.degree,
            "value": value.to_json(),
            "square_upper": decimal_string(mp.mpf(value.upper) ** 2),
        }
