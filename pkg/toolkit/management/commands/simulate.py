from latticesim.experiment import ExperimentConfig, run_experiment
from toolkit.runner import ToolkitCommand
from toolkit.serializers import SimulateConfigSerializer


class Command(ToolkitCommand):
    help = "Sample Construction-A module lattices and compare their statistics with the predictions"
    command_name = "simulate"
    serializer_class = SimulateConfigSerializer
    config_options = ("m", "t", "p", "s", "V", "N", "seed", "h0", "epsilon", "samples_csv")

    def add_config_arguments(self, parser):
        parser.add_argument("--m", type=int)
        parser.add_argument("--t", type=int)
        parser.add_argument("--p", type=int, help="prime below the code; smallest p = 1 mod m by default")
        parser.add_argument("--s", type=int, help="code dimension")
        parser.add_argument("--V", dest="V", help="ball volume")
        parser.add_argument("--N", dest="N", type=int, help="sample count")
        parser.add_argument("--seed", type=int, help="master seed")
        parser.add_argument("--h0")
        parser.add_argument("--epsilon")
        parser.add_argument("--samples-csv", dest="samples_csv", help="also write index,lambda1,rho,seed rows here")

    def compute(self, config, threads):
        experiment = ExperimentConfig(
            m=config["m"],
            t=config["t"],
            s=config["s"],
            V=config["V"],
            N=config["N"],
            master_seed=config["seed"],
            p=config["p"],
            h0=config["h0"],
            epsilon=config["epsilon"],
        )
        report = run_experiment(experiment, threads)
        if config["samples_csv"]:
            report.samples_frame().to_csv(config["samples_csv"], index=False, lineterminator="\n")
        return report.to_json()
