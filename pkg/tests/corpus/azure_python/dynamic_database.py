import os

from azure.cosmos import CosmosClient

client = CosmosClient(os.environ["COSMOS_URL"], os.environ["COSMOS_KEY"])


def main(req):
    body = req.get_json()
    container = client.get_database_client(body["db"]).get_container_client("records")
    container.create_item(body)
    return {"ok": True}
