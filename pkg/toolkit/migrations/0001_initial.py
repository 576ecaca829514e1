# Generated by Django 5.2.5 on 2026-10-16 09:12

import uuid
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='Run',
            fields=[
                ('id', models.UUIDField(default=uuid.uuid4, editable=False, primary_key=True, serialize=False)),
                ('created', models.DateTimeField(auto_now_add=True, db_index=True)),
                ('updated', models.DateTimeField(auto_now=True)),
                ('command', models.CharField(max_length=32)),
                ('config', models.JSONField()),
                ('result', models.JSONField()),
                ('version', models.CharField(max_length=32)),
                ('duration_seconds', models.FloatField()),
            ],
            options={
                'ordering': ['-created'],
                'get_latest_by': 'created',
            },
        ),
    ]
