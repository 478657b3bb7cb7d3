import os

from azure.storage.blob import BlobServiceClient

service = BlobServiceClient.from_connection_string(os.environ["STORAGE_CONN"])


def main(req):
    container = service.get_container_client(os.environ["INVENTORY_CONTAINER"])
    container.upload_blob("inventory.csv", req.get_body())
    return {"uploaded": True}
