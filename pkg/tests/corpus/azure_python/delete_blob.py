import os

from azure.storage.blob import BlobServiceClient

service = BlobServiceClient.from_connection_string(os.environ["STORAGE_CONN"])


def main(req):
    container = service.get_container_client(os.environ["TEMP_CONTAINER"])
    container.delete_blob("tmp/scratch.bin")
    return {"cleaned": True}
