from azure.cosmos import CosmosClient

client = CosmosClient.from_connection_string("AccountEndpoint=https://local;AccountKey=x")
container = client.get_database_client("maindb").get_container_client("profiles")


def main(req):
    container.upsert_item(req.get_json())
    return {"ok": True}
