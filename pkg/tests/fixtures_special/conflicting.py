import os

import boto3
from azure.cosmos import CosmosClient

s3 = boto3.client("s3")
cosmos = CosmosClient(os.environ["COSMOS_URL"], os.environ["COSMOS_KEY"])


def handler(event, context):
    s3.put_object(Bucket="b", Key="k", Body="x")
    cosmos.get_database_client("db").get_container_client("c").create_item(event)
