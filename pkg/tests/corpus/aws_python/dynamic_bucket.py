import boto3

s3 = boto3.client("s3")


def handler(event, context):
    s3.put_object(Bucket=event["bucket"], Key="payload.json", Body=event["payload"])
    return {"ok": True}
