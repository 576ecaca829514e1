from bounds.constants import limiting_constants, limiting_constants_json
from bounds.engine import bound_params, compute_eta
from fieldcore.cyclotomic import make_field
from toolkit.runner import ToolkitCommand
from toolkit.serializers import BoundConfigSerializer

USER_CONSTANTS = ("c", "c_o", "c_S", "card_S")


def params_from_config(config):
    field = make_field(config["m"])
    user = {key: config[key] for key in USER_CONSTANTS if key in config}
    return bound_params(
        field, config["t"], config["constants_mode"], config["k_grid"], config["h0"], config["A"], **user
    )


def add_constants_arguments(parser):
    parser.add_argument("--constants-mode", dest="constants_mode")
    parser.add_argument("--c")
    parser.add_argument("--c-o", dest="c_o")
    parser.add_argument("--c-S", dest="c_S")
    parser.add_argument("--card-S", dest="card_S", type=int)


class Command(ToolkitCommand):
    help = "Certified upper bound on the second-moment error eta for Q(zeta_m)^t"
    command_name = "bound"
    serializer_class = BoundConfigSerializer
    config_options = ("m", "t", "mode", "h0", "k_grid", "A", "constants_mode") + USER_CONSTANTS

    def add_config_arguments(self, parser):
        parser.add_argument("--m", type=int, help="conductor")
        parser.add_argument("--t", type=int, help="module rank")
        parser.add_argument("--mode", choices=["asymptotic", "explicit"])
        parser.add_argument("--h0", help="height cutoff of the explicit sum")
        parser.add_argument("--k-grid", dest="k_grid", nargs="+")
        parser.add_argument("--A", dest="A", help="height-interval count, k^3 when omitted")
        add_constants_arguments(parser)

    def compute(self, config, threads):
        params = params_from_config(config)
        report = compute_eta(params, config["mode"])
        result = {**report.to_json(), "params": params.to_json()}
        if config["constants_mode"] == "uniform_cyclotomic":
            result["limiting_constants"] = limiting_constants_json(limiting_constants())
        return result
