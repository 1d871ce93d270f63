from django.db import models

from geometry.classify import ClassificationMode
from geometry.managers import FingerprintRecordManager


class FingerprintRecord(models.Model):
    """
    A fingerprint computed once and reused by later classification runs
    """

    key = models.CharField(max_length=64, unique=True, db_index=True)
    structure_name = models.CharField(max_length=200)
    mode = models.CharField(max_length=20, choices=ClassificationMode.choices)
    universe_size = models.PositiveIntegerField()
    arity = models.PositiveIntegerField()
    ed_verdict = models.CharField(max_length=30, blank=True)
    digest = models.CharField(max_length=16, db_index=True)
    text = models.TextField()
    hits = models.PositiveIntegerField(default=0)
    created_at = models.DateTimeField(auto_now_add=True)
    updated_at = models.DateTimeField(auto_now=True)

    objects = FingerprintRecordManager()

    class Meta:
        verbose_name = "Fingerprint Record"
        verbose_name_plural = "Fingerprint Records"
        ordering = ['-created_at']
        indexes = [
            models.Index(fields=['mode', 'universe_size', 'arity']),
        ]

    def __str__(self):
        return f"{self.structure_name} - {self.mode} m={self.arity} ({self.digest})"


class ClassificationRun(models.Model):
    run_id = models.CharField(max_length=30, unique=True, blank=True, null=True)
    mode = models.CharField(max_length=20, choices=ClassificationMode.choices)
    universe_size = models.PositiveIntegerField()
    comparison_arity = models.PositiveIntegerField()
    item_count = models.PositiveIntegerField(default=0)
    class_count = models.PositiveIntegerField(default=0)
    undetermined_count = models.PositiveIntegerField(default=0)
    report = models.TextField()
    source = models.CharField(max_length=500, blank=True)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        verbose_name = "Classification Run"
        verbose_name_plural = "Classification Runs"
        ordering = ['-created_at']

    def __str__(self):
        return f"{self.mode} k={self.universe_size} - {self.class_count} classes ({self.run_id})"

    @classmethod
    def record(cls, report, source=''):
        return cls.objects.create(
            mode=report.mode.value,
            universe_size=report.k,
            comparison_arity=report.m,
            item_count=len(report.items),
            class_count=report.class_count,
            undetermined_count=len(report.undetermined),
            report=report.to_text(),
            source=str(source),
        )
