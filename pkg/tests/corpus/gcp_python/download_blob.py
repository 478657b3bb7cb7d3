from google.cloud import storage

client = storage.Client()


def handler(event, context):
    text = client.bucket("app-config").blob("flags.json").download_as_text()
    return {"flags": text}
