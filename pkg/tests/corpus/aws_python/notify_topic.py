import json
import os

import boto3

sns = boto3.client("sns")


def handler(event, context):
    message = json.dumps({"kind": "order", "id": event["order_id"]})
    sns.publish(TopicArn=os.environ["ORDER_TOPIC"], Message=message)
    return {"notified": True}
