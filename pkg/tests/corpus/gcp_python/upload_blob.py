import os

from google.cloud import storage

client = storage.Client()


def handler(event, context):
    bucket = client.bucket(os.environ["DATA_BUCKET"])
    blob = bucket.blob("exports/summary.csv")
    blob.upload_from_string(event["csv"])
    return {"uploaded": True}
