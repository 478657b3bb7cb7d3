import os

from google.cloud import storage

client = storage.Client()


def handler(event, context):
    blob = client.bucket(os.environ["UPLOAD_BUCKET"]).blob(f"uploads/{event['id']}")
    blob.upload_from_string(event["body"])
    return {"ok": True}
