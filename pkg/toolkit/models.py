from django.db import models
from utils.models import BaseModel


class Run(BaseModel):
    command = models.CharField(max_length=32)
    config = models.JSONField()
    result = models.JSONField()
    version = models.CharField(max_length=32)
    duration_seconds = models.FloatField()

    class Meta(BaseModel.Meta):
        ordering = ["-created"]

    def __str__(self):
        return f"{self.command} ({self.created:%Y-%m-%d %H:%M})"
