# Generated by Django 5.2.6 on 2026-10-19 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ClassificationRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('run_id', models.CharField(blank=True, max_length=30, null=True, unique=True)),
                ('mode', models.CharField(choices=[('algebraic', 'Algebraic (equational-domain gated)'), ('l0', 'L0 (quantifier-free)'), ('spec', 'Formula class spec')], max_length=20)),
                ('universe_size', models.PositiveIntegerField()),
                ('comparison_arity', models.PositiveIntegerField()),
                ('item_count', models.PositiveIntegerField(default=0)),
                ('class_count', models.PositiveIntegerField(default=0)),
                ('undetermined_count', models.PositiveIntegerField(default=0)),
                ('report', models.TextField()),
                ('source', models.CharField(blank=True, max_length=500)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'verbose_name': 'Classification Run',
                'verbose_name_plural': 'Classification Runs',
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='FingerprintRecord',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('key', models.CharField(db_index=True, max_length=64, unique=True)),
                ('structure_name', models.CharField(max_length=200)),
                ('mode', models.CharField(choices=[('algebraic', 'Algebraic (equational-domain gated)'), ('l0', 'L0 (quantifier-free)'), ('spec', 'Formula class spec')], max_length=20)),
                ('universe_size', models.PositiveIntegerField()),
                ('arity', models.PositiveIntegerField()),
                ('ed_verdict', models.CharField(blank=True, max_length=30)),
                ('digest', models.CharField(db_index=True, max_length=16)),
                ('text', models.TextField()),
                ('hits', models.PositiveIntegerField(default=0)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('updated_at', models.DateTimeField(auto_now=True)),
            ],
            options={
                'verbose_name': 'Fingerprint Record',
                'verbose_name_plural': 'Fingerprint Records',
                'ordering': ['-created_at'],
                'indexes': [models.Index(fields=['mode', 'universe_size', 'arity'], name='geometry_fi_mode_3c1e2a_idx')],
            },
        ),
    ]
