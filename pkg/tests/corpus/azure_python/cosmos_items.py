import os

from azure.cosmos import CosmosClient

client = CosmosClient(os.environ["COSMOS_URL"], os.environ["COSMOS_KEY"])
container = client.get_database_client("maindb").get_container_client("users")


def main(req):
    body = req.get_json()
    container.create_item(body)
    return container.read_item(item=body["id"], partition_key=body["region"])
