from mpmath import mp

from bounds.engine import compute_eta
from fieldcore.cyclotomic import make_field
from svpredict.predictions import default_epsilon, haar_prediction, module_prediction, sv_bracket
from toolkit.management.commands.bound import USER_CONSTANTS, add_constants_arguments, params_from_config
from toolkit.runner import ToolkitCommand
from toolkit.serializers import SVBoundConfigSerializer
from utils.rendering import decimal_string


class Command(ToolkitCommand):
    help = "Volume-minimum and shortest-vector brackets with their probability floor"
    command_name = "svbound"
    serializer_class = SVBoundConfigSerializer
    config_options = ("m", "t", "mode", "h0", "epsilon", "eta", "constants_mode") + USER_CONSTANTS

    def add_config_arguments(self, parser):
        parser.add_argument("--m", type=int)
        parser.add_argument("--t", type=int)
        parser.add_argument("--mode", choices=["asymptotic", "explicit"])
        parser.add_argument("--h0")
        parser.add_argument("--epsilon", help="a number in (0, 1) or 'auto' for 1/ln n")
        parser.add_argument("--eta", help="use this eta instead of computing it")
        add_constants_arguments(parser)

    def compute(self, config, threads):
        field = make_field(config["m"])
        t = config["t"]
        n = field.degree * t
        if config["eta"] is not None:
            eta, source = mp.mpf(config["eta"]), "supplied"
            report = None
        else:
            params = params_from_config(config)
            report = compute_eta(params, config["mode"])
            eta, source = report.eta_upper, config["mode"]
        epsilon = default_epsilon(n) if config["epsilon"] == "auto" else mp.mpf(config["epsilon"])
        bracket = sv_bracket(field, t, field.omega * eta, epsilon)
        return {
            "eta_upper": decimal_string(eta),
            "eta_source": source,
            "eta_report": report.to_json() if report is not None else None,
            "bracket": bracket.to_json(),
            "module_prediction": module_prediction(field, t).to_json(),
            "haar_prediction": haar_prediction(n).to_json(),
        }
