import hashlib

from django.db import models
from django.db.models import F


class FingerprintRecordManager(models.Manager):
    """
    Cache of computed fingerprints keyed by structure text and computation parameters.
    """

    def cache_key(self, structure_text, kind, arity, depth=None):
        """
        sha256 over everything the fingerprint depends on
        """
        payload = '\n'.join([kind, str(arity), '-' if depth is None else str(depth), structure_text])
        return hashlib.sha256(payload.encode('utf-8')).hexdigest()

    def lookup(self, key):
        record = self.filter(key=key).first()
        if record is not None:
            self.filter(pk=record.pk).update(hits=F('hits') + 1)
        return record

    def remember(self, key, **fields):
        text = fields.get('text', '')
        fields['digest'] = hashlib.sha256(text.encode('utf-8')).hexdigest()[:16]
        record, _ = self.update_or_create(key=key, defaults=fields)
        return record
