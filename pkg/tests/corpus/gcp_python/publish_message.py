import json
import os

from google.cloud import pubsub_v1

publisher = pubsub_v1.PublisherClient()


def handler(event, context):
    payload = json.dumps(event["job"]).encode("utf-8")
    publisher.publish(os.environ["JOB_TOPIC"], payload)
    return {"queued": True}
