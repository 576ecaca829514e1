import io

import pandas as pd

from bounds.figure import COLUMNS, figure_data, write_figure_csv
from toolkit.runner import ToolkitCommand
from toolkit.serializers import FigureConfigSerializer


class Command(ToolkitCommand):
    help = "CSV grid m,t,ln_eta_upper of explicit bounds"
    command_name = "figure"
    serializer_class = FigureConfigSerializer
    config_options = ("conductors", "ranks", "weil_cutoff")

    def add_config_arguments(self, parser):
        parser.add_argument("--conductors", nargs="+", type=int)
        parser.add_argument("--ranks", nargs="+", type=int)
        parser.add_argument("--weil-cutoff", dest="weil_cutoff")

    def compute(self, config, threads):
        frame = figure_data(config["conductors"], config["ranks"], float(config["weil_cutoff"]))
        return frame.to_dict(orient="records")

    def render(self, config, result):
        buffer = io.StringIO()
        write_figure_csv(pd.DataFrame(result, columns=COLUMNS), buffer)
        return buffer.getvalue()
