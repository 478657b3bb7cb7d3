import os

import boto3

db = boto3.client("database")


def handler(event, context):
    db.put_object(Table=os.environ["DB_B"], Key=event["id"], Body=event["record"])
    return {"written": True}
