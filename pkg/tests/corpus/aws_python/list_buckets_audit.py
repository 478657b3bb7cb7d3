import boto3

s3 = boto3.client("s3")


def handler(event, context):
    names = [b["Name"] for b in s3.list_buckets()["Buckets"]]
    return {"buckets": names}
