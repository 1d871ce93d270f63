"""
Signal handlers for the geometry application
"""
import random
import string
from datetime import datetime

from django.db.models.signals import post_save
from django.dispatch import receiver


def generate_unique_id(model_class, field_name, prefix, length):
    """
    Generate an id not yet used by model_class.field_name
    """
    while True:
        random_id = ''.join(random.choices(string.digits, k=length))
        unique_id = f"{prefix}{random_id}"
        if not model_class.objects.filter(**{field_name: unique_id}).exists():
            return unique_id


@receiver(post_save, sender='geometry.ClassificationRun')
def assign_run_id(sender, instance, created, **kwargs):
    if created and not instance.run_id:
        timestamp = datetime.now().strftime("%Y%m%d%H%M%S")
        instance.run_id = generate_unique_id(sender, 'run_id', f"RUN{timestamp}", 6)
        # update() keeps the signal from firing again
        sender.objects.filter(pk=instance.pk).update(run_id=instance.run_id)
