from celery import shared_task

from latticesim.experiment import run_sample


@shared_task
def simulate_chunk(config, indices):
    return [run_sample(config, index) for index in indices]
