import uuid
from django.db import models


class BaseModel(models.Model):
    """UUID key and timestamps shared by stored run records."""
    id = models.UUIDField(primary_key=True, default=uuid.uuid4, editable=False)
    created = models.DateTimeField(auto_now_add=True, db_index=True)
    updated = models.DateTimeField(auto_now=True)

    class Meta:
        abstract = True
        get_latest_by = "created"

    def __str__(self):
        return f"{self.__class__.__name__} {self.id}"
