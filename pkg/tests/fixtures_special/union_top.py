import boto3

s3 = boto3.client("s3")


def handler(event, context):
    s3.put_object(Bucket="shared-bucket", Key="data.json", Body=event["payload"])
    return {"ok": True}
